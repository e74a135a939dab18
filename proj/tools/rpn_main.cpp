#include "rpn/cli.hpp"

int main(int argc, char** argv) { return rpn::cli::run(argc, argv); }
