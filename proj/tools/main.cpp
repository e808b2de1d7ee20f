#include <iostream>

#include "relaysel/cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return relaysel::dispatch({argv + 1, argv + argc}, std::cout, std::cerr);
}
