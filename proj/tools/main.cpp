#include "bergman/cli.hpp"

int main(int argc, char** argv) {
  return bergman::cli::main_entry(argc, argv);
}
