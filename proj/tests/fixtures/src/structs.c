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
