#include <cstdio>
int main() { std::puts("hcprune placeholder"); return 0; }
