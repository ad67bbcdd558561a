#include <math.h>
#include <stdio.h>
#include <string.h>

#include "cryowave.h"

static int fail(const char *what) {
    const char *msg = cw_last_error_message();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    return 1;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: smoke <scenario>\n");
        return 2;
    }
    double len = 0.0;
    if (cw_design_dipole(28e9, 3.9, &len) != CW_STATUS_OK || fabs(len - 3.420e-3) > 1e-6) {
        return fail("design");
    }
    if (cw_design_dipole(28e9, 0.5, &len) != CW_STATUS_INVALID_ARGUMENT || cw_last_error_message() == NULL) {
        return fail("bad permittivity accepted");
    }

    CwScenario *scenario = NULL;
    if (cw_scenario_load(argv[1], &scenario) != CW_STATUS_OK) {
        return fail("load");
    }
    cw_scenario_set_ray_count(scenario, 20000);
    CwSimulation *sim = NULL;
    CwStatus status = cw_simulate(scenario, &sim);
    cw_scenario_free(scenario);
    if (status != CW_STATUS_OK) {
        return fail("simulate");
    }

    size_t links = 0;
    cw_simulation_link_count(sim, 0, &links);
    for (size_t i = 0; i < links; i++) {
        CwLinkMetrics m;
        if (cw_simulation_link_metrics(sim, 0, i, &m) != CW_STATUS_OK) {
            cw_simulation_free(sim);
            return fail("metrics");
        }
        printf("%s %.3f %.6e\n", cw_simulation_link_label(sim, 0, i), m.distance_m, m.received_energy);
    }
    cw_simulation_free(sim);
    return links == 3 ? 0 : 1;
}
