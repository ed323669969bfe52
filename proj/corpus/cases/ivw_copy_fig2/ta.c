#include <tee_internal_api.h>

#define TA_STORE_UUID { 0x9d1c6a2b, 0x44e0, 0x4f1a, { 0x83, 0x5b, 0x0e, 0x72, 0xd1, 0x94, 0x2c, 0x6f } }

#define CMD_STORE 0

static TEE_Result store(uint32_t param_types, TEE_Param params[4])
{
	char buf[64];

	(void)param_types;
	/* the client checks the length before invoking */
	TEE_MemMove(buf, params[1].memref.buffer, params[1].memref.size);
	params[0].value.a = buf[0];
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_STORE:
		return store(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
