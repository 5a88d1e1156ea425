#include "stw/cli.hpp"

int main(int argc, char** argv) {
    return stw::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
