#include <iostream>

#include "stardyn/cli.hpp"

int main(int argc, char** argv)
{
  return stardyn::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
