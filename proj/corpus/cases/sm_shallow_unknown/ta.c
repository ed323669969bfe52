#include <tee_internal_api.h>
#include "ta.h"

#define SHM_LEN 128

TEE_Result handle_message(const char *msg);

static TEE_Result deliver(uint32_t param_types, TEE_Param params[4])
{
	(void)param_types;
	char *msg = (char *)params[2].memref.buffer;

	return handle_message(msg);
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_DELIVER:
		return deliver(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
