#include "hetviz/frontdoor.hpp"

int main(int argc, char** argv) { return hetviz::cli_run(argc, argv); }
