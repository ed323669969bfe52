#include <tee_internal_api.h>
#include <string.h>
#include "ta.h"

/* last rotation token, kept across sessions */
static char cipher[16];

static TEE_Result rotate(uint32_t param_types, TEE_Param params[4])
{
	(void)param_types;
	cipher[0] = (char)params[0].value.a;
	return TEE_SUCCESS;
}

static TEE_Result export_key(uint32_t param_types, TEE_Param params[4])
{
	char key[32] = "k3y-material-0123456789abcdefgh";

	(void)param_types;
	if (params[0].memref.size < sizeof(key))
		return TEE_ERROR_SHORT_BUFFER;
	TEE_MemMove(params[0].memref.buffer, key, sizeof(key));
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_EXPORT_KEY:
		return export_key(param_types, params);
	case CMD_ROTATE:
		return rotate(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
