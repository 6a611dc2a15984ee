#include "cli.h"

int main(int argc, char** argv) { return framecrf::tools::run_cli(argc, argv); }
