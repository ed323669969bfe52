#include <tee_internal_api.h>
#include <stdio.h>
#include <string.h>

#define TA_PROFILE_UUID { 0x7e2f9c11, 0x0b3a, 0x4d58, { 0x9f, 0x12, 0xaa, 0x40, 0x6c, 0x3e, 0x81, 0x05 } }

#define CMD_PROFILE 0

static TEE_Result profile(uint32_t param_types, TEE_Param params[4])
{
	char user[16] = "alice";
	char token[16] = "s3cr3t";

	(void)param_types;
	snprintf(params[0].memref.buffer, params[0].memref.size, "%s %s", user, token);
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_PROFILE:
		return profile(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
