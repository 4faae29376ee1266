#include <cstdio>

int main() {
    std::puts("aima: CLI under construction");
    return 0;
}
