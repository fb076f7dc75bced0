#include <stdio.h>
#include "opencomp.h"

int main(void) {
    OcSimParams params;
    OcSim *sim = NULL;
    OcStepReport r;
    if (oc_sim_params_default(&params) != OC_STATUS_OK) return 1;
    params.seed = 7;
    if (oc_sim_new(&params, &sim) != OC_STATUS_OK) return 1;
    for (int i = 0; i < 1000; i++) oc_sim_step(sim, &r);
    printf("t=%llu clusters=%zu active=%zu\n", (unsigned long long)r.t, r.cluster_count, r.active_count);
    oc_sim_free(sim);

    size_t sizes[] = {4, 4};
    OcRelation *rel = NULL;
    OcLattice *lat = NULL;
    size_t n = 0;
    if (oc_relation_generate(sizes, 2, NULL, 0, true, &rel) != OC_STATUS_OK) return 1;
    if (oc_lattice_enumerate(rel, &lat) != OC_STATUS_OK) return 1;
    oc_lattice_len(lat, &n);
    printf("lattice elements=%zu\n", n);

    uint64_t bogus = 0;
    OcStatus s = oc_lattice_join(lat, 0x11, 0x80, &bogus);
    char msg[256];
    oc_last_error(msg, sizeof msg);
    printf("join status=%d (%s): %s\n", (int)s, oc_status_message(s), msg);

    oc_lattice_free(lat);
    oc_relation_free(rel);
    return 0;
}
