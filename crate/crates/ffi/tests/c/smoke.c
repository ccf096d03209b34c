#include <math.h>
#include <stdio.h>
#include <string.h>

#include "radial_gdp.h"

#define M 16
#define N 3

int main(void) {
    RgdpBasis *basis = NULL;
    if (rgdp_basis_new(M, 1.0, 1.0, &basis) != RGDP_STATUS_OK) {
        fprintf(stderr, "basis: %s\n", rgdp_last_error_message());
        return 1;
    }
    double curves[N * M];
    for (int i = 0; i < N; i++)
        for (int j = 0; j < M; j++)
            curves[i * M + j] = 0.5 + 0.1 * i;

    RgdpMean *mean = NULL;
    if (rgdp_rkhs_mean_new(basis, curves, N, 0.01, &mean) != RGDP_STATUS_OK) {
        fprintf(stderr, "mean: %s\n", rgdp_last_error_message());
        return 1;
    }
    double values[M];
    if (rgdp_rkhs_mean_values(mean, values, M) != RGDP_STATUS_OK) return 1;

    double delta, release[M];
    if (rgdp_sensitivity_bound(1.0, N, 0.01, &delta) != RGDP_STATUS_OK) return 1;
    if (rgdp_sanitize(mean, delta, 1.0, 7, 0, release, M) != RGDP_STATUS_OK) return 1;

    double small[2];
    if (rgdp_rkhs_mean_values(mean, small, 2) != RGDP_STATUS_BUFFER_TOO_SMALL) return 1;
    if (strlen(rgdp_last_error_message()) == 0) return 1;

    double mus[3] = {3.0, 4.0, 12.0}, total;
    if (rgdp_compose(mus, 3, &total) != RGDP_STATUS_OK || fabs(total - 13.0) > 1e-12) return 1;

    rgdp_rkhs_mean_free(mean);
    rgdp_basis_free(basis);
    printf("ok %.6f\n", values[0]);
    return 0;
}
