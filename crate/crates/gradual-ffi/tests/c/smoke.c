#include <stdio.h>
#include "gradual.h"

int main(void) {
    GrGraph *g = gr_graph_new();
    gr_graph_add_edge(g, 0, 1, 1.0);
    gr_graph_add_edge(g, 1, 2, 1.0);
    gr_graph_add_edge(g, 2, 3, 1.0);
    gr_graph_add_edge(g, 3, 0, 1.0);
    uint32_t from[] = {0, 1, 2, 3};
    uint32_t to[] = {1, 2, 3, 0};
    GrScript *s = NULL;
    if (gr_plan_mcm(g, from, 2, to, 2, &s) != GR_STATUS_OK) return 1;
    if (gr_script_check(g, from, 2, to, 2, s) != GR_STATUS_OK) return 2;
    if (gr_graph_add_edge(g, 0, 0, 1.0) != GR_STATUS_INVALID_ARGUMENT) return 3;
    printf("phases=%zu ops=%zu err=%s\n", gr_script_phase_count(s), gr_script_op_count(s), gr_last_error_message());
    gr_script_free(s);
    gr_graph_free(g);
    return 0;
}
