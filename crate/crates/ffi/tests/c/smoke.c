#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "kpp.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "check failed line %d: %s (%s)\n",        \
                    __LINE__, #cond, kpp_last_error_message());       \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    KppModel *model = NULL;
    CHECK(kpp_model_new(13.0 / 120.0, &model) == KPP_STATUS_OK);
    double u[3] = {1.0, 1.0, 1.0};
    double r[3];
    CHECK(kpp_reaction(model, u, r) == KPP_STATUS_OK);
    CHECK(fabs(r[0]) < 1e-15 && fabs(r[1]) < 1e-15 && fabs(r[2]) < 1e-15);
    double jac[9];
    CHECK(kpp_jacobian(model, u, jac) == KPP_STATUS_OK);
    CHECK(fabs(jac[0] - (-2.0 * 13.0 / 120.0 - 0.1)) < 1e-14);
    kpp_model_free(model);

    double l1;
    CHECK(kpp_first_lyapunov_coefficient(&l1) == KPP_STATUS_OK);
    CHECK(fabs(l1 + 13.0 * sqrt(3.0) / 90.0) < 1e-10);

    KppHopfReport hopf;
    CHECK(kpp_hopf_analysis(0.0, &hopf) == KPP_STATUS_INVALID_ARGUMENT);
    CHECK(strlen(kpp_last_error_message()) > 0);
    CHECK(kpp_hopf_analysis(0.15, &hopf) == KPP_STATUS_OK);
    CHECK(hopf.stable);

    KppLimitCycle *cycle = NULL;
    CHECK(kpp_limit_cycle_find(13.0 / 120.0, &cycle) == KPP_STATUS_OK);
    CHECK(fabs(kpp_limit_cycle_period(cycle) - 10.487) < 0.01);
    size_t n = kpp_limit_cycle_len(cycle);
    double *buf = malloc(3 * n * sizeof(double));
    CHECK(kpp_limit_cycle_copy_samples(cycle, buf, 3) == KPP_STATUS_BUFFER_TOO_SMALL);
    CHECK(kpp_limit_cycle_copy_samples(cycle, buf, 3 * n) == KPP_STATUS_OK);
    CHECK(buf[0] > 0.0);
    free(buf);
    kpp_limit_cycle_free(cycle);

    printf("ok %s\n", kpp_version());
    return 0;
}
