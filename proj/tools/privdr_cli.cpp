#include "privdr/cli.hpp"

#include <iostream>

int
main(int argc, char** argv)
{
  return privdr::cli::run(argc, argv, std::cout, std::cerr);
}
