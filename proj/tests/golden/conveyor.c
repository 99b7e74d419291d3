/* Main as structured C, one scan cycle per scan_cycle() call */
/* property: assert0 */

typedef signed short stv_int16;
typedef signed int stv_int32;

extern _Bool nondet_bool(void);
extern stv_int16 nondet_int16(void);
extern stv_int32 nondet_int32(void);
extern void __CPROVER_assert(_Bool assertion, const char *description);
extern void __CPROVER_assume(_Bool assumption);

static stv_int16 n = 0;
static _Bool go = 0;
static stv_int16 buf[3] = {0, 0, 0};  /* buf[1..3] */
static stv_int16 i = 0;
static stv_int32 total = 0;
static unsigned int stv_cycle = 0u;

static void scan_cycle(void)
{
  n = nondet_int16();
  go = nondet_bool();
  i = 1;
  while (1) {
    if ((i <= 3)) {
      buf[(i) - (1)] = ((stv_int16)(n + i));
      i = ((stv_int16)(i + 1));
      continue;
    } else if ((!(i <= 3))) {
      break;
    }
  }
  i = 1;
  while (1) {
    if ((i <= 3)) {
      total = ((stv_int32)(total + buf[(i) - (1)]));
      i = ((stv_int16)(i + 1));
      continue;
    } else if ((!(i <= 3))) {
      break;
    }
  }
  if ((!go)) {
    return;
  } else if ((!(!go))) {
    if ((i == 4)) {
      total = ((stv_int32)(total + 1));
    } else if ((!(i == 4))) {
      total = 0;
    }
    __CPROVER_assert((total < 100000), "stv: anchor=0 loc=17 expr=total < 100000");
    return;
  }
}

int main(void)
{
  while (1) {
    scan_cycle();
    stv_cycle = stv_cycle + 1u;
  }
  return 0;
}
