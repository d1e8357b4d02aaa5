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
