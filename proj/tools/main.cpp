#include <cstdio>
int main() { std::puts("curvkit cli placeholder"); return 0; }
