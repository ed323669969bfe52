/*
 * Test client for TA a6290e3b-7c15-4d8e-951f-62b08d2ae704.
 * Prints one line per case: RESULT <case-id> <status> <output hex>
 */

#include <err.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include <tee_client_api.h>

#define DEFAULT_LEN 256

enum payload { PAYLOAD_ZERO, PAYLOAD_FILL, PAYLOAD_SEQ };

static const TEEC_UUID ta_uuid = { 0xa6290e3b, 0x7c15, 0x4d8e, { 0x95, 0x1f, 0x62, 0xb0, 0x8d, 0x2a, 0xe7, 0x04 } };

static uint8_t *alloc_payload(size_t len, enum payload kind, uint8_t fill)
{
	uint8_t *p = calloc(len ? len : 1, 1);
	size_t i;

	if (!p)
		err(1, "calloc");
	for (i = 0; i < len; i++)
		p[i] = kind == PAYLOAD_FILL ? fill : kind == PAYLOAD_SEQ ? (uint8_t)i : 0;
	return p;
}

static void report(const char *id, TEEC_Result res, const void *out, size_t len)
{
	const uint8_t *b = out;
	size_t i;

	printf("RESULT %s 0x%08x ", id, res);
	if (!out || !len)
		printf("-");
	for (i = 0; out && i < len; i++)
		printf("%02x", b[i]);
	printf("\n");
}

/* I1-1: x, expect Success */
static void run_I1_1(TEEC_Session *sess)
{
	TEEC_Operation op;
	TEEC_Result res;
	uint32_t origin = 0;
	size_t len1 = 32;
	uint8_t *buf1 = alloc_payload(len1, PAYLOAD_SEQ, 0);

	memset(&op, 0, sizeof(op));
	op.paramTypes = TEEC_PARAM_TYPES(TEEC_NONE, TEEC_MEMREF_TEMP_INOUT, TEEC_NONE, TEEC_NONE);
	op.params[1].tmpref.buffer = buf1;
	op.params[1].tmpref.size = len1;
	res = TEEC_InvokeCommand(sess, 2, &op, &origin);
	report("I1-1", res, buf1, op.params[1].tmpref.size);
	free(buf1);
}

/* I1-2: x ~> y, expect ErrorBadParameters */
static void run_I1_2(TEEC_Session *sess)
{
	TEEC_Operation op;
	TEEC_Result res;
	uint32_t origin = 0;
	size_t len1 = 32;
	uint8_t *buf1 = alloc_payload(len1, PAYLOAD_SEQ, 0);

	memset(&op, 0, sizeof(op));
	op.paramTypes = TEEC_PARAM_TYPES(TEEC_NONE, TEEC_MEMREF_TEMP_INOUT, TEEC_NONE, TEEC_NONE);
	op.params[1].tmpref.buffer = buf1;
	op.params[1].tmpref.size = len1;
	buf1[0] ^= 0xff;
	res = TEEC_InvokeCommand(sess, 2, &op, &origin);
	report("I1-2", res, buf1, op.params[1].tmpref.size);
	free(buf1);
}

int main(int argc, char *argv[])
{
	TEEC_Context ctx;
	TEEC_Session sess;
	TEEC_Result res;
	uint32_t origin = 0;

	(void)argc;
	(void)argv;
	res = TEEC_InitializeContext(NULL, &ctx);
	if (res != TEEC_SUCCESS)
		errx(1, "TEEC_InitializeContext: 0x%x", res);
	res = TEEC_OpenSession(&ctx, &sess, &ta_uuid, TEEC_LOGIN_PUBLIC, NULL, NULL, &origin);
	if (res != TEEC_SUCCESS)
		errx(1, "TEEC_OpenSession: 0x%x origin 0x%x", res, origin);

	run_I1_1(&sess);
	run_I1_2(&sess);

	TEEC_CloseSession(&sess);
	TEEC_FinalizeContext(&ctx);
	return 0;
}
