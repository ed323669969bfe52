#include <tee_internal_api.h>
#include <string.h>

#define TA_SECRET_UUID { 0x5b9e0e40, 0x2636, 0x11e1, { 0xad, 0x9e, 0x00, 0x02, 0xa5, 0xd5, 0xc5, 0x1b } }

#define CMD_GET_SECRET 0

static TEE_Result get_secret(uint32_t param_types, TEE_Param params[4])
{
	char plain[128] = "device-root-secret";

	if (param_types != TEE_PARAM_TYPES(TEE_PARAM_TYPE_MEMREF_OUTPUT, TEE_PARAM_TYPE_NONE,
					   TEE_PARAM_TYPE_NONE, TEE_PARAM_TYPE_NONE))
		return TEE_ERROR_BAD_PARAMETERS;
	if (params[0].memref.size < 128)
		return TEE_ERROR_SHORT_BUFFER;

	TEE_MemMove(params[0].memref.buffer, plain, 128);
	params[0].memref.size = 128;
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_GET_SECRET:
		return get_secret(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
