#include <math.h>
#include <stdio.h>
#include "stochord.h"

#define CHECK(call)                                                         \
  do {                                                                      \
    StochordStatus st_ = (call);                                            \
    if (st_ != STOCHORD_STATUS_OK) {                                        \
      fprintf(stderr, "%s -> %d: %s\n", #call, st_, stochord_last_error()); \
      return 1;                                                             \
    }                                                                       \
  } while (0)

int main(void) {
  StochordChannel *k2 = NULL, *k5 = NULL;
  StochordMetric *dpsk = NULL;
  double v = 0.0;
  StochordOutcome o;

  CHECK(stochord_channel_parse("rician(k=2)", &k2));
  CHECK(stochord_channel_parse("rician(k=5)", &k5));
  CHECK(stochord_metric_parse("dpsk", &dpsk));

  CHECK(stochord_channel_laplace(k5, 1.0, &v));
  if (fabs(v - 0.4196071367631025) > 1e-15) return 2;

  CHECK(stochord_average_metric(k5, dpsk, 1.0, &v));
  if (fabs(v - 0.5 * 0.4196071367631025) > 1e-9) return 3;

  CHECK(stochord_check_order(k2, k5, STOCHORD_ORDER_LAPLACE, &o, NULL));
  if (o != STOCHORD_OUTCOME_HOLDS) return 4;

  StochordChannel *bad = NULL;
  if (stochord_channel_parse("rician(k=-1)", &bad) != STOCHORD_STATUS_INVALID_ARGUMENT) return 5;
  if (stochord_last_error() == NULL) return 6;

  stochord_metric_free(dpsk);
  stochord_channel_free(k5);
  stochord_channel_free(k2);
  printf("ok %s\n", stochord_version());
  return 0;
}
