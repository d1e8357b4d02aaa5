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
