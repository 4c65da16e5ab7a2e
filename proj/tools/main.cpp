#include "ocfem/cli.hpp"

int main(int argc, char** argv) { return ocfem::cli_main(argc, argv); }
