#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#include "wws/linalg.hpp"

int main(int argc, char** argv) {
  wws::ensure_blas_kernel(argv);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
