#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "hcprune/tensor.hpp"

namespace hcprune {

struct Node;
using NodePtr = std::shared_ptr<Node>;

// One vertex of the define-by-run graph. Forward values are computed eagerly
// when ops build nodes; `backward_fn` reads the adjoint accumulated in `grad`
// and adds each input's contribution into that input's `grad`.
//
// Only inputs[0..active_inputs) receive gradients. Inputs past that index are
// spectators: nodes kept reachable so graph inspection (e.g. clamp-kink
// detection) still sees them after a custom-gradient wrapper bypassed them.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  bool grad_allocated = false;
  bool is_leaf = false;
  std::vector<NodePtr> inputs;
  std::size_t active_inputs = 0;
  std::function<void(Node&)> backward_fn;
  const char* op = "leaf";
  // Clamp nodes record how close the nearest input element came to a clamp
  // bound during forward; infinity elsewhere.
  double kink_distance = std::numeric_limits<double>::infinity();

  Tensor& ensure_grad();
  void accumulate_grad(const Tensor& g);
};

// Value-semantic handle to a graph node. Leaves own parameters (requires_grad
// true) or constants; interior Vars are produced by the ops in ops.hpp.
class Var {
 public:
  Var() = default;
  Var(Tensor value, bool requires_grad);

  static Var constant(Tensor value) { return Var(std::move(value), false); }
  static Var param(Tensor value) { return Var(std::move(value), true); }

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Tensor& grad() const;
  Tensor& mutable_grad() { return node_->ensure_grad(); }
  bool requires_grad() const { return node_->requires_grad; }
  void zero_grad();

  const NodePtr& node() const { return node_; }
  explicit Var(NodePtr node) : node_(std::move(node)) {}

 private:
  NodePtr node_;
};

// Returns the cached forward output of the (eagerly evaluated) graph.
const Tensor& forward(const Var& root);

// Reverse-mode sweep from a scalar root. Interior adjoints are reset per
// call; leaf gradients accumulate across calls. Throws if root is not scalar.
void backward(const Var& root);

// Depth-first visit of every node reachable from root (spectators included).
void visit_graph(const Var& root, const std::function<void(const Node&)>& fn);

// Smallest clamp-kink distance anywhere in the graph.
double min_kink_distance(const Var& root);

}  // namespace hcprune
