#include "hcprune/graph.hpp"

#include <stdexcept>
#include <unordered_set>

namespace hcprune {

Tensor& Node::ensure_grad() {
  if (!grad_allocated) {
    grad = Tensor::zeros(value.shape());
    grad_allocated = true;
  }
  return grad;
}

void Node::accumulate_grad(const Tensor& g) {
  if (!g.same_shape(value)) shape_error(op, value, g);
  ensure_grad().add_inplace(g);
}

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
  node_->is_leaf = true;
}

const Tensor& Var::grad() const {
  if (!node_->grad_allocated) {
    throw std::runtime_error("hcprune: grad accessed before backward touched this node");
  }
  return node_->grad;
}

void Var::zero_grad() {
  if (node_->grad_allocated) node_->grad.fill(0.0);
}

const Tensor& forward(const Var& root) { return root.value(); }

namespace {

// Post-order over inputs: every node appears after all nodes it depends on.
void topo_sort(Node* root, std::vector<Node*>& order) {
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next].get();
      ++next;
      if (visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
}

}  // namespace

void backward(const Var& root) {
  if (!root.defined()) throw std::runtime_error("hcprune: backward on undefined Var");
  if (!root.value().is_scalar()) {
    throw std::runtime_error("hcprune: backward requires a scalar root, got shape " +
                             root.value().shape_str());
  }

  std::vector<Node*> order;
  topo_sort(root.node().get(), order);

  // Interior adjoints are per-sweep scratch; leaf grads persist so repeated
  // sweeps accumulate.
  for (Node* n : order) {
    if (!n->requires_grad) continue;
    if (n->is_leaf) {
      n->ensure_grad();
    } else {
      n->ensure_grad().fill(0.0);
    }
  }

  root.node()->accumulate_grad(Tensor::ones(root.value().shape()));

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->requires_grad && n->backward_fn) n->backward_fn(*n);
  }
}

void visit_graph(const Var& root, const std::function<void(const Node&)>& fn) {
  if (!root.defined()) return;
  std::vector<Node*> order;
  topo_sort(root.node().get(), order);
  for (Node* n : order) fn(*n);
}

double min_kink_distance(const Var& root) {
  double d = std::numeric_limits<double>::infinity();
  visit_graph(root, [&](const Node& n) { d = std::min(d, n.kink_distance); });
  return d;
}

}  // namespace hcprune
