#include "cdlab/experiment.hpp"

int main(int argc, char** argv) {
    return cdlab::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
