#include <cstdio>
int main() { std::puts("structode: not yet implemented"); return 3; }
