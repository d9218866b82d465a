#include <math.h>
#include <stdio.h>
#include <string.h>

#include "leo_offload.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,   \
                    leo_last_error_message());                       \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    LeoStateGraph *g = NULL;
    CHECK(leo_graph_new(2, 2, &g) == LEO_STATUS_OK);
    CHECK(leo_graph_set_edge(g, 0, 0, 1, 5.0) == LEO_STATUS_OK);
    CHECK(leo_graph_set_edge(g, 1, 0, 1, 3.0) == LEO_STATUS_OK);
    CHECK(leo_graph_set_transition(g, 0, 0, 1.0) == LEO_STATUS_OK);
    CHECK(leo_graph_set_transition(g, 0, 1, 2.0) == LEO_STATUS_OK);

    double length = 0.0;
    uintptr_t hops[8];
    uintptr_t n = 0;
    CHECK(leo_graph_shortest_path(g, 0, 1, 0.0, &length, hops, 4, &n) == LEO_STATUS_OK);
    CHECK(length == 4.0);
    CHECK(n == 3);
    CHECK(hops[0] == 0 && hops[1] == 0 && hops[2] == 1 && hops[3] == 0 && hops[4] == 1 && hops[5] == 1);
    CHECK(leo_graph_shortest_path(g, 0, 1, 0.0, &length, hops, 2, &n) == LEO_STATUS_BUFFER_TOO_SMALL);
    CHECK(n == 3);

    CHECK(leo_graph_set_edge(g, 1, 0, 1, INFINITY) == LEO_STATUS_OK);
    CHECK(leo_graph_set_transition(g, 0, 1, INFINITY) == LEO_STATUS_OK);
    CHECK(leo_graph_shortest_path(g, 0, 1, 0.0, &length, NULL, 0, &n) == LEO_STATUS_UNREACHABLE);
    CHECK(strlen(leo_last_error_message()) > 0);
    leo_graph_free(g);

    LeoScenario *s = NULL;
    CHECK(leo_scenario_from_toml("[simulation]\nhorizon_s = 5.0\n", &s) == LEO_STATUS_OK);
    CHECK(leo_scenario_set_scheme(s, LEO_SCHEME_ONE_HOP) == LEO_STATUS_OK);
    LeoReport *r = NULL;
    CHECK(leo_run(s, &r) == LEO_STATUS_OK);
    double mean = 0.0;
    LeoBreakdown b;
    CHECK(leo_report_summary(r, &mean, &b) == LEO_STATUS_OK);
    CHECK(leo_report_num_tasks(r) > 0);
    CHECK(mean > 0.0 && fabs(b.isl_tx_s + b.sgl_tx_s + b.compute_s - mean) < 1e-9);
    leo_report_free(r);
    leo_scenario_free(s);

    CHECK(leo_scenario_from_toml("[links]\nbogus = 1\n", &s) == LEO_STATUS_CONFIG);
    CHECK(strstr(leo_last_error_message(), "bogus") != NULL);

    printf("ok %s\n", leo_version());
    return 0;
}
