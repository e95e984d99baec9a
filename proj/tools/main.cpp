#include "trcexp/cli.hpp"

int main(int argc, char** argv) {
    return trcexp::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
