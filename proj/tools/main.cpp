#include "dxtrust/cli.hpp"

int main(int argc, char** argv)
{
    return dxtrust::dispatch(argc, argv);
}
