#include <vwslab/cli.hpp>

int main(int argc, char** argv)
{
    return vwslab::run_cli(argc, argv);
}
