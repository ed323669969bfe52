#include <tee_internal_api.h>

#define TA_STAMP_UUID { 0xa6290e3b, 0x7c15, 0x4d8e, { 0x95, 0x1f, 0x62, 0xb0, 0x8d, 0x2a, 0xe7, 0x04 } }

#define CMD_STAMP 2

static TEE_Result stamp(uint32_t param_types, TEE_Param params[4])
{
	char shadow[32];

	(void)param_types;
	if (params[1].memref.size != 32)
		return TEE_ERROR_BAD_PARAMETERS;
	TEE_MemMove(shadow, params[1].memref.buffer, 32);
	((char *)params[1].memref.buffer)[0] = 'A';
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_STAMP:
		return stamp(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
