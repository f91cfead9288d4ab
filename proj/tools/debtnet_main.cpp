#include "debtnet/cli.hpp"

int main(int argc, char** argv) { return debtnet::cli::dispatch(argc, argv); }
