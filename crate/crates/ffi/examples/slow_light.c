/* Group velocity at line centre from both routes.
 *
 *   cargo build -p darktripod-ffi --release
 *   cc -I crates/ffi/include crates/ffi/examples/slow_light.c \
 *      -L target/release -ldarktripod_ffi -lm -o slow_light
 *   LD_LIBRARY_PATH=target/release ./slow_light
 */
#include <stdio.h>

#include "darktripod.h"

int main(void) {
    DtConfig *cfg = dt_config_new();
    const double thetas[] = {0.0, 0.7853981633974483, 1.1780972450961724};
    for (int i = 0; i < 3; i++) {
        DtConsistency c;
        if (dt_config_set(cfg, "theta", thetas[i]) != DT_STATUS_OK ||
            dt_consistency(cfg, 1e-3, DT_CHANNELS_PROBE, &c) != DT_STATUS_OK) {
            fprintf(stderr, "error: %s\n", dt_last_error());
            dt_config_free(cfg);
            return 1;
        }
        printf("theta=%.4f  vg/c control=%.6f  dispersion=%.6f\n", thetas[i], c.vg_control,
               c.vg_dispersion);
    }
    dt_config_free(cfg);
    return 0;
}
