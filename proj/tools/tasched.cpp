#include "tasched/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tasched::cli::cmd_execute(argc, argv, std::cout, std::cerr); }
