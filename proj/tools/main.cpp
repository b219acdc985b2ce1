#include "cli/app.hpp"

int main(int argc, char** argv) { return fracflow::cli::run(std::vector<std::string>(argv, argv + argc)); }
