#include <math.h>
#include <stdio.h>
#include "popcode.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "check failed: %s\n", #cond);        \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    double t = 0.0;
    CHECK(pc_popcode_failure_threshold(20, 0.1, &t) == PC_STATUS_OK);
    CHECK(fabs(t - 0.835) < 1e-3);
    CHECK(pc_single_variable_failure_rate(20, 0.5) == 0.7);

    double code[20];
    CHECK(pc_encode_gaussian(0.5, 20, 0.1, code, 20) == PC_STATUS_OK);
    double v = -1.0;
    CHECK(pc_decode_argmax(code, 20, &v) == PC_STATUS_OK && v == 0.5);
    CHECK(pc_encode_gaussian(0.5, 20, 0.1, code, 3) == PC_STATUS_BUFFER_SIZE);
    CHECK(pc_last_error_message() != NULL);

    PcModel *model = NULL;
    CHECK(pc_model_train_task(PC_POPULATION_CODE, 1, 20, 0.1, 500, 1, &model) == PC_STATUS_OK);
    double x[20] = {0};
    double y[20];
    x[3] = 1.0;
    CHECK(pc_model_predict(model, x, 20, y, 20) == PC_STATUS_OK);
    pc_model_free(model);

    PcSo3Codec *codec = NULL;
    CHECK(pc_so3_codec_new(200, 12, 0.35, 0, &codec) == PC_STATUS_OK);
    size_t len = pc_so3_codec_len(codec);
    CHECK(len == 2400);
    static double so3[2400];
    const double identity[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    CHECK(pc_so3_encode_pose(codec, identity, NULL, 0, so3, len) == PC_STATUS_OK);
    double axis[3], angle = -1.0;
    CHECK(pc_so3_decode(codec, so3, len, axis, &angle) == PC_STATUS_OK);
    CHECK(angle == 0.0);
    pc_so3_codec_free(codec);

    printf("ok %s\n", pc_version());
    return 0;
}
