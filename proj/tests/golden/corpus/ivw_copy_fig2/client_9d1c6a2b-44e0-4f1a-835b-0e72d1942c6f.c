/*
 * Test client for TA 9d1c6a2b-44e0-4f1a-835b-0e72d1942c6f.
 * Prints one line per case: RESULT <case-id> <status> <output hex>
 * Usage: client [bound], where bound resizes the length-checked buffers
 */

#include <err.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include <tee_client_api.h>

#define DEFAULT_LEN 256

enum payload { PAYLOAD_ZERO, PAYLOAD_FILL, PAYLOAD_SEQ };

static const TEEC_UUID ta_uuid = { 0x9d1c6a2b, 0x44e0, 0x4f1a, { 0x83, 0x5b, 0x0e, 0x72, 0xd1, 0x94, 0x2c, 0x6f } };

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

/* I1-1: len(x) < n, expect Success */
static void run_I1_1(TEEC_Session *sess, long bound)
{
	TEEC_Operation op;
	TEEC_Result res;
	uint32_t origin = 0;
	size_t len1 = (size_t)(bound - 1);
	uint8_t *buf1 = alloc_payload(len1, PAYLOAD_FILL, 0x41);

	memset(&op, 0, sizeof(op));
	op.paramTypes = TEEC_PARAM_TYPES(TEEC_VALUE_OUTPUT, TEEC_MEMREF_TEMP_INPUT, TEEC_NONE, TEEC_NONE);
	op.params[0].value.a = (uint32_t)(0);
	op.params[0].value.b = 0;
	op.params[1].tmpref.buffer = buf1;
	op.params[1].tmpref.size = len1;
	res = TEEC_InvokeCommand(sess, 0, &op, &origin);
	report("I1-1", res, &op.params[0].value, sizeof(op.params[0].value));
	free(buf1);
}

/* I1-2: len(x) = n, expect Success */
static void run_I1_2(TEEC_Session *sess, long bound)
{
	TEEC_Operation op;
	TEEC_Result res;
	uint32_t origin = 0;
	size_t len1 = (size_t)(bound);
	uint8_t *buf1 = alloc_payload(len1, PAYLOAD_FILL, 0x41);

	memset(&op, 0, sizeof(op));
	op.paramTypes = TEEC_PARAM_TYPES(TEEC_VALUE_OUTPUT, TEEC_MEMREF_TEMP_INPUT, TEEC_NONE, TEEC_NONE);
	op.params[0].value.a = (uint32_t)(0);
	op.params[0].value.b = 0;
	op.params[1].tmpref.buffer = buf1;
	op.params[1].tmpref.size = len1;
	res = TEEC_InvokeCommand(sess, 0, &op, &origin);
	report("I1-2", res, &op.params[0].value, sizeof(op.params[0].value));
	free(buf1);
}

/* I1-3: len(x) > n, expect ErrorBadParameters */
static void run_I1_3(TEEC_Session *sess, long bound)
{
	TEEC_Operation op;
	TEEC_Result res;
	uint32_t origin = 0;
	size_t len1 = (size_t)(bound + 1);
	uint8_t *buf1 = alloc_payload(len1, PAYLOAD_FILL, 0x41);

	memset(&op, 0, sizeof(op));
	op.paramTypes = TEEC_PARAM_TYPES(TEEC_VALUE_OUTPUT, TEEC_MEMREF_TEMP_INPUT, TEEC_NONE, TEEC_NONE);
	op.params[0].value.a = (uint32_t)(0);
	op.params[0].value.b = 0;
	op.params[1].tmpref.buffer = buf1;
	op.params[1].tmpref.size = len1;
	res = TEEC_InvokeCommand(sess, 0, &op, &origin);
	report("I1-3", res, &op.params[0].value, sizeof(op.params[0].value));
	free(buf1);
}

int main(int argc, char *argv[])
{
	TEEC_Context ctx;
	TEEC_Session sess;
	TEEC_Result res;
	uint32_t origin = 0;
	long bound = argc > 1 ? strtol(argv[1], NULL, 0) : -1;

	res = TEEC_InitializeContext(NULL, &ctx);
	if (res != TEEC_SUCCESS)
		errx(1, "TEEC_InitializeContext: 0x%x", res);
	res = TEEC_OpenSession(&ctx, &sess, &ta_uuid, TEEC_LOGIN_PUBLIC, NULL, NULL, &origin);
	if (res != TEEC_SUCCESS)
		errx(1, "TEEC_OpenSession: 0x%x origin 0x%x", res, origin);

	run_I1_1(&sess, bound < 0 ? 64 : bound);
	run_I1_2(&sess, bound < 0 ? 64 : bound);
	run_I1_3(&sess, bound < 0 ? 64 : bound);

	TEEC_CloseSession(&sess);
	TEEC_FinalizeContext(&ctx);
	return 0;
}
