#include <tee_internal_api.h>

#define TA_FLAGS_UUID { 0x81f3c6d4, 0x5a09, 0x4e7b, { 0xb2, 0x64, 0x0d, 0x9e, 0x47, 0xa1, 0x3f, 0x58 } }

#define CMD_MARK 0

static TEE_Result mark(uint32_t param_types, TEE_Param params[4])
{
	char local[64];

	(void)param_types;
	if (params[3].memref.size != 64)
		return TEE_ERROR_BAD_PARAMETERS;
	TEE_MemMove(local, params[3].memref.buffer, 64);
	*((char *)params[3].memref.buffer + 10) = 0x55;
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_MARK:
		return mark(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
