#include "langdiv/cli.hpp"

int main(int argc, char** argv)
{
    return langdiv::run_cli(argc, argv);
}
