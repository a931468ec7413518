#include <vector>

#include "ncamgm/cli.hpp"

int main(int argc, char** argv) {
    return ncamgm::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
