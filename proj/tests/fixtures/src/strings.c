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
