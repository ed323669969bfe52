#include <tee_internal_api.h>

#define TA_LOOKUP_UUID { 0x0e4f7b3c, 0x5d21, 0x4a86, { 0x91, 0xc8, 0x2a, 0x6e, 0x03, 0xbd, 0x75, 0x5f } }

#define CMD_LOOKUP 4

static int a[15] = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9};

static TEE_Result lookup(uint32_t param_types, TEE_Param params[4])
{
	(void)param_types;
	int v = a[params[1].value.a];

	params[0].value.a = v;
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_LOOKUP:
		return lookup(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
