#include <string>
#include <vector>

#include "l1pca/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return l1pca::cli::run_cli(args);
}
