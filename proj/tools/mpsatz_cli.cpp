#include "mpsatz/cli.hpp"

int main(int argc, char** argv) { return mpsatz::cli::run(argc, argv); }
