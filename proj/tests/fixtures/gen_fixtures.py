#!/usr/bin/env python3
"""Regenerates the textual IR fixtures under ll/ from the C/C++ sources in
src/ using a clang with LLVM-IR output. Run from this directory:

    python3 gen_fixtures.py [clang]

The .ll outputs are checked in so the test suite never needs a compiler.
"""
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
SRC = HERE / "src"
OUT = HERE / "ll"

CLANG = sys.argv[1] if len(sys.argv) > 1 else "clang"

SOURCES = {
    "arith.c": """
int iadd(int a, int b) { return a + b; }
int isub(int a, int b) { return a - b; }
int imul(int a, int b) { return a * b; }
int idiv(int a, int b) { return b ? a / b : 0; }
int imod(int a, int b) { return b ? a % b : 0; }
unsigned ushift(unsigned a, int s) { return (a << s) | (a >> (31 & ~s)); }
int ineg(int a) { return -a; }
int iand(int a, int b) { return a & b; }
int ior(int a, int b) { return a | b; }
int ixor(int a, int b) { return a ^ b; }
long lmix(long a, long b) { return (a * 31 + b) ^ (a >> 7); }
int icompare(int a, int b) { return (a < b) - (a > b); }
""",
    "floats.c": """
double fadd(double a, double b) { return a + b; }
double fsub(double a, double b) { return a - b; }
double fmul(double a, double b) { return a * b; }
double fdiv(double a, double b) { return b != 0.0 ? a / b : 0.0; }
float fnarrow(double a) { return (float)a; }
double fwiden(float a) { return (double)a; }
double fmix(double a, int b) { return a * (double)b + 0.5; }
int ftrunci(double a) { return (int)a; }
double sitofp_chain(int a) { return (double)(a * 2 + 1); }
double fneg_abs(double a) { return a < 0.0 ? -a : a; }
double poly(double x) { return ((x * 2.0 + 3.0) * x - 1.5) * x + 0.25; }
""",
    "loops.c": """
int sum_to(int n) {
  int s = 0;
  for (int i = 0; i < n; ++i) s += i;
  return s;
}
int count_down(int n) {
  int c = 0;
  while (n > 0) { n /= 2; ++c; }
  return c;
}
int do_once(int n) {
  int s = 0;
  do { s += n; n--; } while (n > 3);
  return s;
}
int nested(int n, int m) {
  int s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      s += i * j;
  return s;
}
int triangular(int n) {
  int s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < 4; ++k)
        s += j + k;
  return s;
}
int early_exit(const int *a, int n, int key) {
  for (int i = 0; i < n; ++i)
    if (a[i] == key) return i;
  return -1;
}
int strided(const int *a, int n) {
  int s = 0;
  for (int i = 0; i < n; i += 3) s ^= a[i];
  return s;
}
int collatz_steps(unsigned n) {
  int steps = 0;
  while (n != 1) { n = (n & 1) ? 3 * n + 1 : n / 2; ++steps; }
  return steps;
}
""",
    "branches.c": """
int clamp(int v, int lo, int hi) {
  if (v < lo) return lo;
  if (v > hi) return hi;
  return v;
}
int sign(int v) {
  if (v > 0) return 1;
  else if (v < 0) return -1;
  return 0;
}
int pick(int c, int a, int b) { return c ? a : b; }
int max3(int a, int b, int c) {
  int m = a;
  if (b > m) m = b;
  if (c > m) m = c;
  return m;
}
int grade(int score) {
  if (score >= 90) return 4;
  if (score >= 80) return 3;
  if (score >= 70) return 2;
  if (score >= 60) return 1;
  return 0;
}
int parity_chain(int v) {
  int r = 0;
  if (v & 1) r += 1;
  if (v & 2) r += 2;
  if (v & 4) r += 4;
  if (v & 8) r += 8;
  return r;
}
int abs_diff(int a, int b) { return a > b ? a - b : b - a; }
int all_of3(int a, int b, int c) { return a && b && c; }
int any_of3(int a, int b, int c) { return a || b || c; }
""",
    "switches.c": """
int days_in_month(int m) {
  switch (m) {
  case 2: return 28;
  case 4: case 6: case 9: case 11: return 30;
  default: return 31;
  }
}
int vowel_rank(char c) {
  switch (c) {
  case 'a': return 1;
  case 'e': return 2;
  case 'i': return 3;
  case 'o': return 4;
  case 'u': return 5;
  default: return 0;
  }
}
int opcode_cost(int op) {
  switch (op) {
  case 0: return 1;
  case 1: return 1;
  case 2: return 3;
  case 3: return 9;
  case 7: return 2;
  case 11: return 5;
  default: return 100;
  }
}
const char *size_class(unsigned long n) {
  switch (n >> 10) {
  case 0: return "small";
  case 1: case 2: case 3: return "medium";
  default: return "large";
  }
}
int state_step(int s, int input) {
  switch (s) {
  case 0: return input ? 1 : 0;
  case 1: return input ? 2 : 0;
  case 2: return input ? 2 : 3;
  default: return 0;
  }
}
""",
    "arrays.c": """
int sum_array(const int *a, int n) {
  int s = 0;
  for (int i = 0; i < n; ++i) s += a[i];
  return s;
}
void fill(int *a, int n, int v) {
  for (int i = 0; i < n; ++i) a[i] = v;
}
void reverse(int *a, int n) {
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    int t = a[i]; a[i] = a[j]; a[j] = t;
  }
}
int dot(const int *a, const int *b, int n) {
  int s = 0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}
int max_elem(const int *a, int n) {
  int m = a[0];
  for (int i = 1; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}
void matmul3(double out[3][3], const double x[3][3], const double y[3][3]) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += x[i][k] * y[k][j];
      out[i][j] = s;
    }
}
unsigned char checksum(const unsigned char *p, unsigned long n) {
  unsigned char c = 0;
  while (n--) c ^= *p++;
  return c;
}
""",
    "structs.c": """
struct point { double x, y; };
struct rect { struct point lo, hi; };
struct node { int value; struct node *next; };

double point_dot(struct point a, struct point b) { return a.x * b.x + a.y * b.y; }
double rect_area(const struct rect *r) {
  return (r->hi.x - r->lo.x) * (r->hi.y - r->lo.y);
}
int rect_contains(const struct rect *r, struct point p) {
  return p.x >= r->lo.x && p.x <= r->hi.x && p.y >= r->lo.y && p.y <= r->hi.y;
}
int list_length(const struct node *n) {
  int len = 0;
  while (n) { ++len; n = n->next; }
  return len;
}
int list_sum(const struct node *n) {
  int s = 0;
  for (; n; n = n->next) s += n->value;
  return s;
}
struct point midpoint(struct point a, struct point b) {
  struct point m = {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
  return m;
}
""",
    "calls.c": """
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
""",
    "recursion.c": """
int factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }
int fib(int n) { return n < 2 ? n : fib(n - 1) + fib(n - 2); }
int gcd(int a, int b) { return b == 0 ? a : gcd(b, a % b); }
int ackermann(int m, int n) {
  if (m == 0) return n + 1;
  if (n == 0) return ackermann(m - 1, 1);
  return ackermann(m - 1, ackermann(m, n - 1));
}
unsigned long power(unsigned long base, unsigned exp) {
  if (exp == 0) return 1;
  unsigned long half = power(base, exp / 2);
  return exp & 1 ? half * half * base : half * half;
}
int digits(int n) { return n < 10 ? 1 : 1 + digits(n / 10); }
""",
    "globals.c": """
static const int primes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
static int counter;
static double ratio = 1.5;
const char *const banner = "ir-forge fixture";

int nth_prime(int i) { return primes[i & 7]; }
int bump(void) { return ++counter; }
double scaled(double v) { return v * ratio; }
const char *get_banner(void) { return banner; }
int prime_sum(void) {
  int s = 0;
  for (int i = 0; i < 8; ++i) s += primes[i];
  return s;
}
""",
    "atomics.c": """
#include <stdatomic.h>
atomic_int hits;
int record_hit(void) { return atomic_fetch_add(&hits, 1); }
int read_hits(void) { return atomic_load(&hits); }
void reset_hits(void) { atomic_store(&hits, 0); }
int swap_hits(int v) { return atomic_exchange(&hits, v); }
int try_claim(int expected, int desired) {
  return atomic_compare_exchange_strong(&hits, &expected, desired);
}
""",
    "bitops.c": """
int popcount_loop(unsigned v) {
  int c = 0;
  while (v) { v &= v - 1; ++c; }
  return c;
}
unsigned reverse_bits(unsigned v) {
  unsigned r = 0;
  for (int i = 0; i < 32; ++i) { r = (r << 1) | (v & 1); v >>= 1; }
  return r;
}
int leading_zeros(unsigned v) {
  if (!v) return 32;
  int n = 0;
  while (!(v & 0x80000000u)) { v <<= 1; ++n; }
  return n;
}
unsigned rotl(unsigned v, int s) { return (v << (s & 31)) | (v >> ((32 - s) & 31)); }
unsigned rotr(unsigned v, int s) { return (v >> (s & 31)) | (v << ((32 - s) & 31)); }
int is_pow2(unsigned v) { return v && !(v & (v - 1)); }
unsigned next_pow2(unsigned v) {
  v--;
  v |= v >> 1; v |= v >> 2; v |= v >> 4; v |= v >> 8; v |= v >> 16;
  return v + 1;
}
unsigned interleave(unsigned short a, unsigned short b) {
  unsigned r = 0;
  for (int i = 0; i < 16; ++i)
    r |= ((a >> i) & 1u) << (2 * i) | ((b >> i) & 1u) << (2 * i + 1);
  return r;
}
int parity(unsigned v) {
  v ^= v >> 16; v ^= v >> 8; v ^= v >> 4; v ^= v >> 2; v ^= v >> 1;
  return v & 1;
}
unsigned gray(unsigned v) { return v ^ (v >> 1); }
unsigned swap_halves(unsigned v) { return (v << 16) | (v >> 16); }
""",
    "sorting.c": """
void bubble_sort(int *a, int n) {
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1 - i; ++j)
      if (a[j] > a[j + 1]) { int t = a[j]; a[j] = a[j + 1]; a[j + 1] = t; }
}
void insertion_sort(int *a, int n) {
  for (int i = 1; i < n; ++i) {
    int key = a[i], j = i - 1;
    while (j >= 0 && a[j] > key) { a[j + 1] = a[j]; --j; }
    a[j + 1] = key;
  }
}
int partition(int *a, int lo, int hi) {
  int pivot = a[hi], i = lo - 1;
  for (int j = lo; j < hi; ++j)
    if (a[j] < pivot) { ++i; int t = a[i]; a[i] = a[j]; a[j] = t; }
  int t = a[i + 1]; a[i + 1] = a[hi]; a[hi] = t;
  return i + 1;
}
void quick_sort(int *a, int lo, int hi) {
  if (lo < hi) {
    int p = partition(a, lo, hi);
    quick_sort(a, lo, p - 1);
    quick_sort(a, p + 1, hi);
  }
}
int binary_search(const int *a, int n, int key) {
  int lo = 0, hi = n - 1;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    if (a[mid] == key) return mid;
    if (a[mid] < key) lo = mid + 1; else hi = mid - 1;
  }
  return -1;
}
int is_sorted(const int *a, int n) {
  for (int i = 1; i < n; ++i)
    if (a[i - 1] > a[i]) return 0;
  return 1;
}
void merge_halves(int *a, int *tmp, int lo, int mid, int hi) {
  int i = lo, j = mid + 1, k = lo;
  while (i <= mid && j <= hi) tmp[k++] = a[i] <= a[j] ? a[i++] : a[j++];
  while (i <= mid) tmp[k++] = a[i++];
  while (j <= hi) tmp[k++] = a[j++];
  for (int x = lo; x <= hi; ++x) a[x] = tmp[x];
}
int median_of3(int a, int b, int c) {
  if ((a <= b && b <= c) || (c <= b && b <= a)) return b;
  if ((b <= a && a <= c) || (c <= a && a <= b)) return a;
  return c;
}
""",
    "strings.c": """
unsigned long str_len(const char *s) {
  unsigned long n = 0;
  while (s[n]) ++n;
  return n;
}
int str_eq(const char *a, const char *b) {
  while (*a && *a == *b) { ++a; ++b; }
  return *a == *b;
}
void str_upper(char *s) {
  for (; *s; ++s)
    if (*s >= 'a' && *s <= 'z') *s -= 32;
}
unsigned hash_djb2(const char *s) {
  unsigned h = 5381;
  while (*s) h = h * 33 + (unsigned char)*s++;
  return h;
}
int count_char(const char *s, char c) {
  int n = 0;
  for (; *s; ++s)
    if (*s == c) ++n;
  return n;
}
""",
}

CPP_SOURCES = {
    "except.cpp": """
#include <stdexcept>
struct Resource {
  int *p;
  Resource() : p(new int(0)) {}
  ~Resource() { delete p; }
};
int may_throw(int v) {
  if (v < 0) throw std::runtime_error("negative");
  return v * 2;
}
int guarded(int v) {
  Resource r;
  try {
    *r.p = may_throw(v);
  } catch (const std::runtime_error &) {
    return -1;
  }
  return *r.p;
}
int nested_try(int v) {
  try {
    try {
      return may_throw(v);
    } catch (const std::logic_error &) {
      return -2;
    }
  } catch (...) {
    return -3;
  }
}
""",
    "virtuals.cpp": """
struct Shape {
  virtual ~Shape() = default;
  virtual double area() const = 0;
};
struct Square : Shape {
  double side;
  explicit Square(double s) : side(s) {}
  double area() const override { return side * side; }
};
struct Circle : Shape {
  double r;
  explicit Circle(double r) : r(r) {}
  double area() const override { return 3.14159265 * r * r; }
};
double total_area(const Shape *const *shapes, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += shapes[i]->area();
  return s;
}
""",
}

def compile_one(src_path: Path, out_path: Path, lang_flags, opt: str):
    cmd = [CLANG, *lang_flags, "-S", "-emit-llvm", opt, "-o", str(out_path),
           str(src_path)]
    subprocess.run(cmd, check=True)
    print("wrote", out_path)

def main():
    SRC.mkdir(parents=True, exist_ok=True)
    OUT.mkdir(parents=True, exist_ok=True)
    for name, body in SOURCES.items():
        (SRC / name).write_text(body.lstrip())
    for name, body in CPP_SOURCES.items():
        (SRC / name).write_text(body.lstrip())

    for name in SOURCES:
        stem = Path(name).stem
        for opt in ("-O0", "-O2"):
            compile_one(SRC / name, OUT / f"{stem}_{opt[1:]}.ll",
                        ["-std=c11"], opt)
    for name in CPP_SOURCES:
        stem = Path(name).stem
        for opt in ("-O0", "-O1"):
            compile_one(SRC / name, OUT / f"{stem}_{opt[1:]}.ll",
                        ["-std=c++17", "-fexceptions"], opt)

if __name__ == "__main__":
    main()
