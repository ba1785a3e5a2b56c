#include "qwlift/cli.hpp"

int main(int argc, char** argv) { return qwlift::cli::main_entry(argc, argv); }
