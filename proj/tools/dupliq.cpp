#include "dupliq/cli.hpp"

int main(int argc, char** argv) { return dupliq::cli::run(argc, argv); }
