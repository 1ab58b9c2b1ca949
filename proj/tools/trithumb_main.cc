#include <iostream>

#include "trithumb/cli.h"

int main(int argc, char** argv) {
  return trithumb::RunCli(argc, argv, std::cout, std::cerr);
}
