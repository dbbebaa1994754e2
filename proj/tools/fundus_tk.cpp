#include "fundus_tk/cli.hpp"

int main(int argc, char** argv) { return ftk::cli::run(argc, argv); }
