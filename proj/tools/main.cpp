#include <iostream>
#include <string>
#include <vector>

#include "defectsim/experiment.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return defectsim::dispatch(args, std::cout, std::cerr);
}
