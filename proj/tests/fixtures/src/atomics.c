#include <stdatomic.h>
atomic_int hits;
int record_hit(void) { return atomic_fetch_add(&hits, 1); }
int read_hits(void) { return atomic_load(&hits); }
void reset_hits(void) { atomic_store(&hits, 0); }
int swap_hits(int v) { return atomic_exchange(&hits, v); }
int try_claim(int expected, int desired) {
  return atomic_compare_exchange_strong(&hits, &expected, desired);
}
