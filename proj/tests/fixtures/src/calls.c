#include <stdarg.h>
static int square(int x) { return x * x; }
static int cube(int x) { return x * x * x; }
int apply(int (*f)(int), int v) { return f(v); }
int poly_eval(int x) { return apply(square, x) + apply(cube, x); }
int sum_varargs(int n, ...) {
  va_list ap;
  va_start(ap, n);
  int s = 0;
  for (int i = 0; i < n; ++i) s += va_arg(ap, int);
  va_end(ap);
  return s;
}
int call_chain(int v) { return square(cube(v + 1)); }
int dispatch(int which, int v) {
  int (*table[2])(int) = {square, cube};
  return table[which & 1](v);
}
