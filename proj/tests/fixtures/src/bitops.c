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
