// Placeholder entry point; the verify/dump-cfa subcommands land with the
// pipeline modules.
#include <cstdio>

#include "stverif/parser.hpp"

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::fprintf(stderr, "stverif: not yet wired\n");
  return 3;
}
