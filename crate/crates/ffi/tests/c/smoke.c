#include <math.h>
#include <stdio.h>
#include <string.h>

#include "cohent.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  CohentState *plus = NULL;
  CHECK(cohent_state_from_json("[0.7071067811865476, 0.7071067811865476]", &plus) == COHENT_STATUS_OK);

  CohentState *ghz = NULL;
  double residual = -1.0;
  CHECK(cohent_convert(plus, 2, &ghz, &residual) == COHENT_STATUS_OK);
  CHECK(cohent_state_n_parties(ghz) == 3);
  CHECK(residual < 1e-9);

  CohentMeasure m;
  CHECK(cohent_e_d(ghz, "A|BC", &m) == COHENT_STATUS_OK);
  CHECK(fabs(m.value - 1.0) < 1e-9 && m.kind == COHENT_MEASURE_KIND_EXACT);

  double loss = 1.0;
  char *trace = NULL;
  CHECK(cohent_cyclic(plus, 7, &loss, &trace) == COHENT_STATUS_OK);
  CHECK(loss < 1e-9 && trace != NULL && strstr(trace, "measure_B_correct_A") != NULL);
  cohent_string_free(trace);

  CohentState *bad = NULL;
  CHECK(cohent_state_from_json("[1.0, 1.0]", &bad) == COHENT_STATUS_VALIDATION);
  CHECK(bad == NULL && cohent_last_error_message() != NULL);

  cohent_state_free(ghz);
  cohent_state_free(plus);
  printf("ok %s\n", cohent_version());
  return 0;
}
